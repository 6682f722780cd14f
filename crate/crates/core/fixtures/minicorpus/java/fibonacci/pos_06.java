public class Seq {
    static long fib(int n) {
        long prev = 0, curr = 1;
        for (int k = 1; k < n; k++) {
            long t = prev + curr;
            prev = curr;
            curr = t;
        }
        return n == 0 ? 0 : curr;
    }
}
