public class Dictionary {
    public int search(String[] words, String w) {
        int left = 0, right = words.length - 1;
        while (left <= right) {
            int mid = (left + right) / 2;
            int c = words[mid].compareTo(w);
            if (c == 0) return mid;
            if (c < 0) left = mid + 1;
            else right = mid - 1;
        }
        return -1;
    }
}
