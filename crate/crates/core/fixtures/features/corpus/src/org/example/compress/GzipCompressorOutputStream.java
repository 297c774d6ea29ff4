package org.example.compress;

/**
 * Writes gzip compressed data with a member header.
 */
public class GzipCompressorOutputStream extends CompressorOutputStream {
    /** Writes the gzip member header. */
    private void writeHeader(String filename) throws IOException {
        byte[] name = filename.getBytes();
    }

    public void close() throws IOException {
        writeHeader("");
    }
}
