public class Max {
    static int maxOf(int[] a) {
        int best = a[0];
        for (int v : a) {
            if (v > best) {
                best = v;
            }
        }
        return best;
    }
}
