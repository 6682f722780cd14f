public class Rows {
    void swapRows(int[][] m, int a, int b) {
        int[] tmp = m[a];
        m[a] = m[b];
        m[b] = tmp;
    }
}
