package org.example.compress;

/**
 * Writes bzip2 compressed blocks to an output stream.
 */
public class BZip2CompressorOutputStream extends CompressorOutputStream {
    private final CRC crc = new CRC();
    private BlockSort blockSorter;
    private boolean finished;

    /**
     * Finishes the compression without closing the underlying stream.
     */
    public void finish() throws IOException {
        if (!finished) {
            finished = true;
            blockSorter = null;
        }
    }

    /** Called by the garbage collector. */
    protected void finalize() throws Throwable {
        finish();
        super.finalize();
    }

    public void write(int b) throws IOException {
        crc.updateCRC(b);
    }
}
