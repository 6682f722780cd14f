public class Flat {
    int[] transposeFlat(int[] flat, int rows, int cols) {
        int[] out = new int[flat.length];
        for (int r = 0; r < rows; r++) {
            for (int c = 0; c < cols; c++) {
                out[c * rows + r] = flat[r * cols + c];
            }
        }
        return out;
    }
}
