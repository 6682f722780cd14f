public class Runs {
    int longestRun(String s) {
        int best = s.isEmpty() ? 0 : 1, cur = 1;
        for (int i = 1; i < s.length(); i++) {
            if (s.charAt(i) == s.charAt(i - 1)) {
                cur++;
                best = Math.max(best, cur);
            } else {
                cur = 1;
            }
        }
        return best;
    }
}
