public class CharArray {
    static boolean isPalindrome(String word) {
        char[] c = word.toCharArray();
        for (int i = 0; i < c.length / 2; i++) {
            if (c[i] != c[c.length - 1 - i]) {
                return false;
            }
        }
        return true;
    }
}
