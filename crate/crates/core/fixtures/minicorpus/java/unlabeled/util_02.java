public class Sorting {
    static void bubbleSort(double[] d) {
        for (int i = 0; i < d.length; i++) {
            for (int j = 0; j < d.length - 1 - i; j++) {
                if (d[j] > d[j + 1]) {
                    double t = d[j];
                    d[j] = d[j + 1];
                    d[j + 1] = t;
                }
            }
        }
    }
}
