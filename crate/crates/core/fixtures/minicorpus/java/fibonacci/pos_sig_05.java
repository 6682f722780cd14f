public class FibList {
    public List<Integer> fibonacci(int count) {
        List<Integer> list = new ArrayList<>();
        list.add(0);
        list.add(1);
        for (int i = 2; i < count; i++) {
            int next = list.get(i - 1) + list.get(i - 2);
            list.add(next);
        }
        return list;
    }
}
