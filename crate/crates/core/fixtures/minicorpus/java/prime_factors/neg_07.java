public class DigitCount {
    int countDigits(int n) {
        int c = 0;
        do {
            n /= 10;
            c++;
        } while (n != 0);
        return c;
    }
}
