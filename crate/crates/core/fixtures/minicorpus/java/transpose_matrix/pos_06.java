public class Flip {
    int[][] flip(int[][] grid) {
        int[][] out = new int[grid[0].length][grid.length];
        for (int x = 0; x < grid.length; x++)
            for (int y = 0; y < grid[x].length; y++)
                out[y][x] = grid[x][y];
        return out;
    }
}
