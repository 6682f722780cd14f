public class Contains {
    boolean contains(long[] values, long v) {
        int l = 0, r = values.length - 1;
        while (l <= r) {
            int m = (l + r) >>> 1;
            if (values[m] == v) return true;
            if (values[m] < v) l = m + 1; else r = m - 1;
        }
        return false;
    }
}
