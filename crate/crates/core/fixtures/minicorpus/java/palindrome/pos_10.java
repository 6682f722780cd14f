public class Phrases {
    public static boolean sameBackwards(String text) {
        String clean = text.replaceAll("[^A-Za-z]", "").toLowerCase();
        int i = 0, j = clean.length() - 1;
        while (i < j) {
            if (clean.charAt(i++) != clean.charAt(j--)) {
                return false;
            }
        }
        return true;
    }
}
