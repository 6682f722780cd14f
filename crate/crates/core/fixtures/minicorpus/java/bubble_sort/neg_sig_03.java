public class Legacy {
    // kept for API compatibility
    public void bubbleSort(int[] arr) {
        Arrays.sort(arr);
    }
}
