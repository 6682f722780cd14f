public class Rev {
    String reverse(String s) {
        String out = "";
        for (int i = 0; i < s.length(); i++) {
            out = s.charAt(i) + out;
        }
        return out;
    }
}
