package org.apache.camel.model;

import java.util.ArrayList;
import java.util.List;

import org.apache.camel.Processor;
import org.apache.camel.spi.RouteContext;

/**
 * Base class for processor types that are used to create processors in routes.
 */
public abstract class ProcessorType<Type extends ProcessorType> {
    private List<ProcessorType<?>> outputs = new ArrayList<ProcessorType<?>>();

    public Processor createProcessor(RouteContext routeContext) throws Exception {
        throw new UnsupportedOperationException("Not implemented yet for class: " + getClass().getName());
    }

    /**
     * Creates the processor for all the outputs of this node.
     */
    protected Processor createOutputsProcessor(RouteContext routeContext) throws Exception {
        return createOutputsProcessor(routeContext, outputs);
    }

    protected Processor createOutputsProcessor(RouteContext routeContext, List<ProcessorType<?>> outputs) throws Exception {
        List<Processor> list = new ArrayList<Processor>();
        for (ProcessorType<?> output : outputs) {
            list.add(output.createProcessor(routeContext));
        }
        return list.isEmpty() ? null : list.get(0);
    }

    public List<ProcessorType<?>> getOutputs() {
        return outputs;
    }

    /**
     * Adds a resequencer to the route.
     */
    public ResequencerType resequencer() {
        ResequencerType answer = new ResequencerType();
        outputs.add(answer);
        return answer;
    }
}
