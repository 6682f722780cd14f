public class MatrixObj {
    public Matrix transposed() {
        Matrix out = new Matrix(cols, rows);
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                out.data[j][i] = data[i][j];
            }
        }
        return out;
    }
}
