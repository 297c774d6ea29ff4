package org.example.compress;

/**
 * Base class for compressing output streams.
 */
public abstract class CompressorOutputStream extends OutputStream {
    /** Bytes written so far. */
    public long getBytesWritten() {
        return 0L;
    }
}
