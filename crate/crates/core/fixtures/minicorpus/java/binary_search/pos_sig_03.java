public class ShiftSearch {
    static int binarySearch(long[] sorted, long value) {
        int left = 0;
        int right = sorted.length - 1;
        while (left <= right) {
            int middle = (left + right) >>> 1;
            long probe = sorted[middle];
            if (probe < value) left = middle + 1;
            else if (probe > value) right = middle - 1;
            else return middle;
        }
        return -(left + 1);
    }
}
