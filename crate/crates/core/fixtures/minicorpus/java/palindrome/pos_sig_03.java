public class NumberCheck {
    public boolean isPalindrome(int number) {
        int original = number, reversed = 0;
        while (number > 0) {
            reversed = reversed * 10 + number % 10;
            number /= 10;
        }
        return original == reversed;
    }
}
