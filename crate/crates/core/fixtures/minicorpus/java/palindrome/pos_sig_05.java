public class RecursiveCheck {
    boolean isPalindrome(String s, int lo, int hi) {
        if (lo >= hi) {
            return true;
        }
        return s.charAt(lo) == s.charAt(hi) && isPalindrome(s, lo + 1, hi - 1);
    }
}
