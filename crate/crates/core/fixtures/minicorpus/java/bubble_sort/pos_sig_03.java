public class GenericSort {
    public static <T extends Comparable<T>> void bubbleSort(T[] items) {
        for (int i = items.length - 1; i > 0; i--) {
            for (int j = 0; j < i; j++) {
                if (items[j].compareTo(items[j + 1]) > 0) {
                    T tmp = items[j];
                    items[j] = items[j + 1];
                    items[j + 1] = tmp;
                }
            }
        }
    }
}
