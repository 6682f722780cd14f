public class Filter {
    List<String> keepPalindromes(List<String> words) {
        List<String> out = new ArrayList<>();
        for (String w : words) {
            if (isPalindrome(w)) {
                out.add(w);
            }
        }
        return out;
    }
}
