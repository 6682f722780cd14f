public class Show {
    void showTransposed(int[][] m) {
        int[][] t = MatrixUtils.transpose(m);
        for (int[] row : t) {
            System.out.println(Arrays.toString(row));
        }
    }
}
