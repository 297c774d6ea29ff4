package org.apache.commons.compress.compressors.bzip2;

import java.io.IOException;
import java.io.InputStream;

import org.apache.commons.compress.compressors.CompressorInputStream;

/**
 * An input stream that decompresses from the BZip2 format to be read as any
 * other stream.
 */
public class BZip2CompressorInputStream extends CompressorInputStream {

    private final CRC crc = new CRC();
    private InputStream in;
    private int currentState;
    private boolean decompressConcatenated;

    public BZip2CompressorInputStream(final InputStream in, final boolean decompressConcatenated) throws IOException {
        this.in = in;
        this.decompressConcatenated = decompressConcatenated;
        initBlock();
    }

    @Override
    public int read() throws IOException {
        if (this.in != null) {
            final int r = read0();
            count(r < 0 ? -1 : 1);
            return r;
        }
        throw new IOException("stream closed");
    }

    private int read0() throws IOException {
        switch (currentState) {
        case 0:
            return -1;
        default:
            return in.read();
        }
    }

    /**
     * Reads the block header and resets the block checksum.
     */
    private boolean initBlock() throws IOException {
        final int magic = in.read();
        if (magic < 0) {
            return false;
        }
        crc.initializeCRC();
        currentState = 1;
        return true;
    }

    @Override
    public void close() throws IOException {
        final InputStream inShadow = this.in;
        if (inShadow != null) {
            try {
                inShadow.close();
            } finally {
                this.in = null;
            }
        }
    }
}
