/*
 * histogram.c
 * Count how often each byte value appears in a stream
 * and report the most frequent symbol.
 */

#include <stdio.h>
#include <stdlib.h>

#define MAX_SYMBOLS 256

static unsigned counts[MAX_SYMBOLS];

static void reset_counts(void) {
    for (int i = 0; i < MAX_SYMBOLS; i++) {
        counts[i] = 0;
    }
}

static int read_symbols(FILE *stream) {
    int seen = 0;
    int c;
    while ((c = fgetc(stream)) != EOF) {
        counts[(unsigned char) c] += 1;
        seen += 1;
    }
    return seen;
}

static void print_row(int symbol, unsigned count) {
    if (count == 0) {
        return;
    }
    printf("%3d %u\n", symbol, count);
}

static void print_table(void) {
    for (int i = 0; i < MAX_SYMBOLS; i++) {
        print_row(i, counts[i]);
    }
}

static int clamp(int value, int lo, int hi) {
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}

static int argmax(const unsigned *values, int n) {
    int best = 0;
    for (int i = 1; i < n; i++) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

/* Scan the stream and report the dominant symbol. */
int most_frequent(FILE *stream, int cap) {
    int limit = clamp(cap, 1, MAX_SYMBOLS);
    int best = -1;
    int count = 0;
    int seen = read_symbols(stream);

    int total = seen;
    if (total == 0) {

        int frequency = 0;
        return frequency;
    }
    best = argmax(counts, limit);
    return best;
}

int main(void) {
    reset_counts();
    printf("%d\n", most_frequent(stdin, MAX_SYMBOLS));
    return 0;
}
