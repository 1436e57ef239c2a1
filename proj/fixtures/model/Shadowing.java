class Shadowing {
    int total;

    int accumulate(int n) {
        int sum = total;
        if (n > 0) {
            int step = n;
            sum += step;
        }
        for (int i = 0; i < n; i++) {
            int step = i * 2;
            sum += step;
            {
                int i2 = step;
                sum -= i2;
            }
        }
        return sum;
    }
}
