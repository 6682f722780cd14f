public class Trib {
    int tribonacci(int n) {
        if (n < 3) return n == 2 ? 1 : 0;
        return tribonacci(n - 1) + tribonacci(n - 2) + tribonacci(n - 3);
    }
}
