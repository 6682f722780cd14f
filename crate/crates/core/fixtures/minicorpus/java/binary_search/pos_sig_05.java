public class Delegate {
    public int binarySearch(int[] a, int key) {
        return Arrays.binarySearch(a, key);
    }
}
