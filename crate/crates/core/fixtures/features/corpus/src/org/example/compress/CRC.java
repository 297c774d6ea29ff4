package org.example.compress;

/**
 * Cyclic redundancy check over the block data.
 */
class CRC {
    private int globalCrc = 0xffffffff;

    /** Folds one byte into the checksum. */
    void updateCRC(int inCh) {
        globalCrc = (globalCrc << 8) ^ inCh;
    }

    int getFinalCRC() {
        return ~globalCrc;
    }
}
