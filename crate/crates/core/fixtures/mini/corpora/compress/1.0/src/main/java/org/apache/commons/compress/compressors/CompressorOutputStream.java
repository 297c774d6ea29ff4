package org.apache.commons.compress.compressors;

import java.io.OutputStream;

/**
 * Base class for all compressor output streams.
 */
public abstract class CompressorOutputStream extends OutputStream {
}
