public class Lookup {
    int indexOf(int[] sorted, int x) {
        int lo = 0, hi = sorted.length - 1;
        while (lo <= hi) {
            int m = (lo + hi) / 2;
            if (sorted[m] < x) lo = m + 1;
            else if (sorted[m] > x) hi = m - 1;
            else return m;
        }
        return -1;
    }
}
