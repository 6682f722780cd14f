public class Gnome {
    static void gnomeSort(int[] a) {
        int pos = 0;
        while (pos < a.length) {
            if (pos == 0 || a[pos] >= a[pos - 1]) {
                pos++;
            } else {
                int t = a[pos];
                a[pos] = a[pos - 1];
                a[pos - 1] = t;
                pos--;
            }
        }
    }
}
