public class ListSort {
    // sorts in place through the List API
    public void bubbleSort(List<Integer> list) {
        for (int i = 0; i < list.size(); i++) {
            for (int j = 0; j < list.size() - 1 - i; j++) {
                if (list.get(j) > list.get(j + 1)) {
                    Integer held = list.get(j);
                    list.set(j, list.get(j + 1));
                    list.set(j + 1, held);
                }
            }
        }
    }
}
