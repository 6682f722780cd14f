public class FibMemo {
    long fibonacci(int n, long[] memo) {
        if (n < 2) return n;
        if (memo[n] != 0) return memo[n];
        memo[n] = fibonacci(n - 1, memo) + fibonacci(n - 2, memo);
        return memo[n];
    }
}
