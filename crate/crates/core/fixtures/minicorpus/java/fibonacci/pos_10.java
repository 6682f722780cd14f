public class Printer {
    public void printFibonacciSeries(int terms) {
        int first = 0, second = 1, sum;
        for (int i = 0; i < terms; i++) {
            System.out.print(first + " ");
            sum = first + second;
            first = second;
            second = sum;
        }
    }
}
