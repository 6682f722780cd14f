public class Arrays2 {
    static void sort(int[] a) {
        boolean changed;
        do {
            changed = false;
            for (int i = 0; i < a.length - 1; i++) {
                if (a[i] > a[i + 1]) {
                    int x = a[i];
                    a[i] = a[i + 1];
                    a[i + 1] = x;
                    changed = true;
                }
            }
        } while (changed);
    }
}
