public class RecSearch {
    int binarySearch(int[] a, int target, int lo, int hi) {
        if (lo > hi) {
            return -1;
        }
        int mid = lo + (hi - lo) / 2;
        if (a[mid] == target) return mid;
        if (a[mid] > target) return binarySearch(a, target, lo, mid - 1);
        return binarySearch(a, target, mid + 1, hi);
    }
}
