public class ArrayFactors {
    static int[] primeFactors(int number) {
        int[] buf = new int[32];
        int count = 0;
        int divisor = 2;
        while (number > 1) {
            if (number % divisor == 0) {
                buf[count++] = divisor;
                number /= divisor;
            } else {
                divisor++;
            }
        }
        return Arrays.copyOf(buf, count);
    }
}
