public class Words {
    public boolean checkPalindrome(String word) {
        String lower = word.toLowerCase();
        for (int i = 0, j = lower.length() - 1; i < j; i++, j--) {
            if (lower.charAt(i) != lower.charAt(j)) return false;
        }
        return true;
    }
}
