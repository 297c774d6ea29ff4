package org.apache.commons.compress.compressors;

import java.io.InputStream;

/**
 * Base class for all compressor input streams. Keeps track of the number of
 * bytes read so far.
 */
public abstract class CompressorInputStream extends InputStream {
    private long bytesRead = 0;

    /**
     * Increments the counter of already read bytes.
     * @param read the number of bytes read
     */
    protected void count(final long read) {
        if (read != -1) {
            bytesRead = bytesRead + read;
        }
    }

    /**
     * Returns the current number of bytes read from this stream.
     */
    public long getBytesRead() {
        return bytesRead;
    }
}
