public class Dupes {
    static int countDuplicatePairs(int[] a) {
        int count = 0;
        for (int i = 0; i < a.length; i++)
            for (int j = i + 1; j < a.length; j++)
                if (a[i] == a[j]) count++;
        return count;
    }
}
