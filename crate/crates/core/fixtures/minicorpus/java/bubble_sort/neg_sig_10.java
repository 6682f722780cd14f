public class Bench {
    long timeSort(int[] data) {
        long start = System.nanoTime();
        Sorter.bubbleSort(data.clone());
        return System.nanoTime() - start;
    }
}
