package org.apache.commons.compress.compressors.bzip2;

import java.io.IOException;
import java.io.OutputStream;

import org.apache.commons.compress.compressors.CompressorOutputStream;

/**
 * An output stream that compresses into the BZip2 format into another stream.
 */
public class BZip2CompressorOutputStream extends CompressorOutputStream {

    public static final int MIN_BLOCKSIZE = 1;
    public static final int MAX_BLOCKSIZE = 9;

    private final int blockSize100k;
    private final CRC crc = new CRC();
    private BlockSort blockSorter;
    private OutputStream out;
    private volatile boolean closed;

    /**
     * Constructs a new stream with a blocksize of 900k.
     * @param out the destination stream
     */
    public BZip2CompressorOutputStream(final OutputStream out) throws IOException {
        this(out, MAX_BLOCKSIZE);
    }

    public BZip2CompressorOutputStream(final OutputStream out, final int blockSize) throws IOException {
        if (blockSize < 1) {
            throw new IllegalArgumentException("blockSize(" + blockSize + ") < 1");
        }
        this.blockSize100k = blockSize;
        this.out = out;
        this.blockSorter = new BlockSort(blockSize);
        init();
    }

    @Override
    public void write(final int b) throws IOException {
        if (closed) {
            throw new IOException("closed");
        }
        crc.updateCRC(b);
        out.write(b);
    }

    /**
     * Overridden to warn about an unclosed stream and finish it.
     */
    @Override
    protected void finalize() throws Throwable {
        if (!closed) {
            System.err.println("Unclosed BZip2CompressorOutputStream detected, will *not* close it");
        }
        super.finalize();
    }

    /**
     * Finishes compression without closing the underlying stream.
     * The output stream is written to when the last block is flushed.
     */
    public void finish() throws IOException {
        if (!closed) {
            closed = true;
            try {
                blockSorter = null;
                endCompression();
            } finally {
                out.flush();
            }
        }
    }

    @Override
    public void close() throws IOException {
        if (!closed) {
            final OutputStream outShadow = this.out;
            finish();
            outShadow.close();
        }
    }

    @Override
    public void flush() throws IOException {
        final OutputStream outShadow = this.out;
        if (outShadow != null) {
            outShadow.flush();
        }
    }

    private void init() throws IOException {
        out.write('B');
        out.write('Z');
        crc.initializeCRC();
    }

    private void endCompression() throws IOException {
        out.write(crc.getFinalCRC());
    }

    public final int getBlockSize() {
        return this.blockSize100k;
    }
}
