package org.apache.commons.compress.compressors.bzip2;

/**
 * Encapsulates the Burrows-Wheeler sorting algorithm needed by the
 * compressor.
 */
class BlockSort {

    private final int[] fmap;
    private final char[] quadrant;

    BlockSort(final int blockSize) {
        final int n = blockSize * 100000;
        fmap = new int[n];
        quadrant = new char[n + 20];
    }

    /**
     * Sorts the block using the fallback algorithm for highly repetitive input.
     */
    final void fallbackSort(final int[] fmap, final byte[] block, final int nblock) {
        for (int i = 0; i < nblock; i++) {
            fmap[i] = i;
        }
        fallbackQSort3(fmap, block, 0, nblock - 1);
    }

    private void fallbackQSort3(final int[] fmap, final byte[] block, final int loSt, final int hiSt) {
        if (hiSt - loSt < 1) {
            return;
        }
        final int mid = (loSt + hiSt) >>> 1;
        fmap[mid] = block[mid];
    }
}
