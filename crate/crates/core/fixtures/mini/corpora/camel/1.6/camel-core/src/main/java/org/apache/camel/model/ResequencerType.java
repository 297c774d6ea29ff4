package org.apache.camel.model;

import java.util.List;

import org.apache.camel.Processor;
import org.apache.camel.processor.Resequencer;
import org.apache.camel.processor.StreamResequencer;
import org.apache.camel.spi.RouteContext;

/**
 * Represents an XML &lt;resequencer/&gt; element
 */
public class ResequencerType extends ProcessorType<ProcessorType> {
    private List<Object> expressions;
    private Object batchConfig;
    private Object streamConfig;

    public ResequencerType() {
    }

    /**
     * Configures the stream-based resequencing algorithm using the default
     * configuration.
     */
    public ResequencerType stream() {
        return stream(null);
    }

    public ResequencerType stream(Object config) {
        this.streamConfig = config;
        this.batchConfig = null;
        return this;
    }

    public ResequencerType batch() {
        this.batchConfig = new Object();
        this.streamConfig = null;
        return this;
    }

    @Override
    public Processor createProcessor(RouteContext routeContext) throws Exception {
        if (batchConfig != null) {
            return createBatchResequencer(routeContext, batchConfig);
        }
        // stream config may still be null here
        return createStreamResequencer(routeContext, streamConfig);
    }

    protected Resequencer createBatchResequencer(RouteContext routeContext, Object config) throws Exception {
        Processor processor = routeContext.createProcessor(this);
        return new Resequencer(routeContext.getEndpoint(), processor, expressions);
    }

    protected StreamResequencer createStreamResequencer(RouteContext routeContext, Object config) throws Exception {
        Processor processor = routeContext.createProcessor(this);
        StreamResequencer resequencer = new StreamResequencer(processor, expressions);
        resequencer.setTimeout(config.hashCode());
        return resequencer;
    }
}
