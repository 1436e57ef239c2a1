void fill(int[][] grid, int value) {
    int rows = grid.length;
    for (int r = 0; r < rows; r++) {
        for (int c = 0; c < grid[r].length; c++) {
            if (grid[r][c] == 0) {
                grid[r][c] = value;
            }
        }
    }
    int checked = rows;
    int marked = value;
    log(checked, marked);
}
