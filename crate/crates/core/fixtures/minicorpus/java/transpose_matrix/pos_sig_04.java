public class Nested {
    List<List<Integer>> transpose(List<List<Integer>> m) {
        List<List<Integer>> out = new ArrayList<>();
        for (int j = 0; j < m.get(0).size(); j++) {
            List<Integer> row = new ArrayList<>();
            for (int i = 0; i < m.size(); i++) {
                row.add(m.get(i).get(j));
            }
            out.add(row);
        }
        return out;
    }
}
