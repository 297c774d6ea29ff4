package org.apache.commons.compress.compressors.bzip2;

/**
 * A simple class the hold and calculate the CRC for sanity checking of the
 * data.
 */
class CRC {
    private static final int[] crc32Table = new int[256];

    private int globalCrc;

    CRC() {
        initializeCRC();
    }

    void initializeCRC() {
        globalCrc = 0xffffffff;
    }

    int getFinalCRC() {
        return ~globalCrc;
    }

    int getGlobalCRC() {
        return globalCrc;
    }

    /** Folds one byte into the running checksum. */
    void updateCRC(final int inCh) {
        int temp = (globalCrc >> 24) ^ inCh;
        if (temp < 0) {
            temp = 256 + temp;
        }
        globalCrc = (globalCrc << 8) ^ crc32Table[temp];
    }
}
