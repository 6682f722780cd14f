public class Chars {
    int binarySearch(char[] cs, char c) {
        int lo = 0, hi = cs.length - 1;
        while (lo <= hi) {
            int mid = (lo + hi) >>> 1;
            if (cs[mid] == c) return mid;
            if (cs[mid] < c) lo = mid + 1;
            else hi = mid - 1;
        }
        return -1;
    }
}
