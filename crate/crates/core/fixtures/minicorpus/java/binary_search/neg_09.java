public class Halves {
    int[] firstHalf(int[] a) {
        int half = a.length / 2;
        int[] out = new int[half];
        for (int i = 0; i < half; i++) {
            out[i] = a[i];
        }
        return out;
    }
}
