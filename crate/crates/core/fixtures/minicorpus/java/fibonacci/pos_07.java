public class SeqArray {
    int[] fibSequence(int n) {
        int[] seq = new int[Math.max(n, 2)];
        seq[0] = 0;
        seq[1] = 1;
        for (int i = 2; i < n; i++) {
            seq[i] = seq[i - 1] + seq[i - 2];
        }
        return seq;
    }
}
