public class Sentence {
    public String reverseWords(String sentence) {
        List<String> words = new ArrayList<>(Arrays.asList(sentence.split(" ")));
        Collections.reverse(words);
        return String.join(" ", words);
    }
}
