public class Parity {
    boolean isEven(int n) {
        return n % 2 == 0;
    }
}
