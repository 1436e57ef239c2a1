int sumPositive(int[] xs) {
    int total = 0;
    int i = 0;
    while (i < xs.length) {
        if (xs[i] > 0)
            total += xs[i];
        i++;
    }
    return total;
}
