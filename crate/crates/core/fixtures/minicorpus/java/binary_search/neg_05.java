public class Interp {
    int interpolationSearch(int[] a, int key) {
        int lo = 0, hi = a.length - 1;
        while (lo <= hi && key >= a[lo] && key <= a[hi]) {
            if (a[hi] == a[lo]) return a[lo] == key ? lo : -1;
            int pos = lo + ((key - a[lo]) * (hi - lo)) / (a[hi] - a[lo]);
            if (a[pos] == key) return pos;
            if (a[pos] < key) lo = pos + 1;
            else hi = pos - 1;
        }
        return -1;
    }
}
