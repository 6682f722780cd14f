public class Report {
    void printPrimeFactors(int n) {
        System.out.println(n + " = " + primeFactors(n));
    }
}
