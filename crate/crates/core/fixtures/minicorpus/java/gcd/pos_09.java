public class ArrayGcd {
    public int findGCD(int[] nums) {
        int result = nums[0];
        for (int i = 1; i < nums.length; i++) {
            int a = result, b = nums[i];
            while (b != 0) {
                int t = b;
                b = a % b;
                a = t;
            }
            result = a;
        }
        return result;
    }
}
