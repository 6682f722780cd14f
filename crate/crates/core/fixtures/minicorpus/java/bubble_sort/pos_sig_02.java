public class Sorter {
    void bubbleSort(int[] data) {
        boolean swapped = true;
        int pass = 0;
        while (swapped) {
            swapped = false;
            for (int k = 1; k < data.length - pass; k++) {
                if (data[k - 1] > data[k]) {
                    int t = data[k - 1];
                    data[k - 1] = data[k];
                    data[k] = t;
                    swapped = true;
                }
            }
            pass++;
        }
    }
}
